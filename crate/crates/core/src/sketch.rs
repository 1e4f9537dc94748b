//! Count-min sketch with lock-free weighted updates.
//!
//! Every cell is an `AtomicU64`, so any number of threads may call
//! [`CountMinSketch::add`] concurrently and the final matrix equals a
//! sequential replay of the same adds in any order. Estimates should only be
//! read once all writers have finished.

use std::io::Write;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_ROWS: usize = 4;
/// Columns per edge used when no explicit width is given.
pub const DEFAULT_COL_FRACTION: f64 = 1e-3;
pub const DEFAULT_MIN_COLS: usize = 64;

/// `max(ceil(fraction * edges), min_cols)`.
pub fn cols_for_edges(edge_count: usize, fraction: f64, min_cols: usize) -> usize {
    let scaled = (fraction * edge_count as f64).ceil() as usize;
    scaled.max(min_cols).max(1)
}

/// Multiply-add-shift hash over 64-bit keys: `((a*x + b) mod 2^128) >> 64`,
/// reduced to `0..cols` by a multiply-high.
#[derive(Debug, Clone, Copy)]
struct RowHash {
    a: u128,
    b: u128,
}

impl RowHash {
    #[inline]
    fn bucket(&self, key: u64, cols: usize) -> usize {
        let h = (self.a.wrapping_mul(key as u128).wrapping_add(self.b) >> 64) as u64;
        ((h as u128 * cols as u128) >> 64) as usize
    }
}

#[derive(Debug)]
pub struct CountMinSketch {
    rows: usize,
    cols: usize,
    cells: Vec<AtomicU64>,
    hashes: Vec<RowHash>,
    saturated: AtomicBool,
}

impl CountMinSketch {
    pub fn new(rows: usize, cols: usize, seed: u64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "sketch needs at least one row and column, got {rows}x{cols}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hashes = (0..rows)
            .map(|_| RowHash {
                a: rng.gen::<u128>() | 1,
                b: rng.gen::<u128>(),
            })
            .collect();
        Ok(CountMinSketch {
            rows,
            cols,
            cells: (0..rows * cols).map(|_| AtomicU64::new(0)).collect(),
            hashes,
            saturated: AtomicBool::new(false),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn cell(&self, row: usize, key: u64) -> &AtomicU64 {
        &self.cells[row * self.cols + self.hashes[row].bucket(key, self.cols)]
    }

    /// Adds `amount` to one cell per row. Counters saturate at `u64::MAX`.
    pub fn add(&self, key: u64, amount: u64) {
        if amount == 0 {
            return;
        }
        for row in 0..self.rows {
            let prev = self
                .cell(row, key)
                .fetch_update(Ordering::Relaxed, Ordering::Relaxed, |c| {
                    Some(c.saturating_add(amount))
                })
                .unwrap_or_else(|c| c);
            if prev.checked_add(amount).is_none() && !self.saturated.swap(true, Ordering::Relaxed) {
                log::warn!("count-min counter saturated at u64::MAX");
            }
        }
    }

    /// Row-wise minimum of the key's cells; never below the true count.
    pub fn estimate(&self, key: u64) -> u64 {
        (0..self.rows)
            .map(|row| self.cell(row, key).load(Ordering::Relaxed))
            .min()
            .unwrap_or(0)
    }

    /// Row-major copy of the counter matrix.
    pub fn matrix(&self) -> Vec<u64> {
        self.cells.iter().map(|c| c.load(Ordering::Relaxed)).collect()
    }

    pub fn saturated(&self) -> bool {
        self.saturated.load(Ordering::Relaxed)
    }

    /// One line per row, tab separated.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        let m = self.matrix();
        for row in m.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(u64::to_string).collect();
            writeln!(out, "{}", line.join("\t"))?;
        }
        Ok(())
    }
}
