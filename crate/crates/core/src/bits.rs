//! Seeded antipodal bit source.
//!
//! Bits come from ChaCha8 seeded with [`SeedableRng::seed_from_u64`], so a
//! seed pins the sequence across platforms and runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Antipodal symbols `alpha_i` in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolStream {
    symbols: Vec<i8>,
    /// `None` when the symbols were supplied externally.
    seed: Option<u64>,
}

impl SymbolStream {
    /// Wraps externally supplied symbols. Every element must be `-1` or `+1`.
    pub fn from_symbols(symbols: Vec<i8>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptySymbols);
        }
        if let Some(bad) = symbols.iter().find(|&&a| a != 1 && a != -1) {
            return Err(Error::InvalidParams(format!("symbol {bad} is not antipodal")));
        }
        Ok(Self {
            symbols,
            seed: None,
        })
    }

    pub fn symbols(&self) -> &[i8] {
        &self.symbols
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Running sums `sum_{m <= n} alpha_m`, one per symbol.
    pub fn cumulative(&self) -> Vec<i64> {
        self.symbols
            .iter()
            .scan(0i64, |acc, &a| {
                *acc += i64::from(a);
                Some(*acc)
            })
            .collect()
    }
}

pub fn generate_bits(count: usize, seed: u64) -> Result<SymbolStream> {
    if count == 0 {
        return Err(Error::EmptySymbols);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols = (0..count)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect();
    Ok(SymbolStream {
        symbols,
        seed: Some(seed),
    })
}
