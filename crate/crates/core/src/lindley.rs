//! Lindley's recursion `W(k) = max(W(k-1) + X(k), 0)` and the partial-sum and
//! block-sum transforms of an increment trace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::processes::{Trace, TraceKind};

/// Non-overlapping block sums `Y(i) = X((i-1)B+1) + ... + X(iB)` for
/// `i = 1..floor(n/B)`. The trailing `n mod B` increments are dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockedTrace {
    block_size: usize,
    blocks: Vec<f64>,
    dropped: usize,
}

impl BlockedTrace {
    /// Wraps already-blocked data.
    pub fn from_blocks(blocks: Vec<f64>, block_size: usize) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::parameter("block size must be at least 1"));
        }
        if blocks.is_empty() {
            return Err(Error::insufficient("no blocks"));
        }
        if let Some(v) = blocks.iter().find(|v| !v.is_finite()) {
            return Err(Error::parameter(format!("block sum {v} is not finite")));
        }
        Ok(Self {
            block_size,
            blocks,
            dropped: 0,
        })
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn blocks(&self) -> &[f64] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn dropped(&self) -> usize {
        self.dropped
    }
}

pub fn lindley_recursion(increments: &Trace, w0: f64) -> Result<Trace> {
    if increments.kind() != TraceKind::Increments {
        return Err(Error::parameter(
            "Lindley recursion needs an increment trace",
        ));
    }
    if !(w0 >= 0.0 && w0.is_finite()) {
        return Err(Error::parameter(format!(
            "initial wait must be finite and nonnegative, got {w0}"
        )));
    }
    let mut w = w0;
    let waits = increments
        .values()
        .iter()
        .map(|x| {
            w = (w + x).max(0.0);
            w
        })
        .collect();
    Ok(increments.derived(waits, TraceKind::Waits))
}

pub fn block_sums(increments: &Trace, block_size: usize) -> Result<BlockedTrace> {
    if block_size == 0 {
        return Err(Error::parameter("block size must be at least 1"));
    }
    let n = increments.len();
    if n < block_size {
        return Err(Error::insufficient(format!(
            "trace of length {n} is shorter than one block of size {block_size}"
        )));
    }
    let blocks = increments
        .values()
        .chunks_exact(block_size)
        .map(|c| c.iter().sum())
        .collect();
    Ok(BlockedTrace {
        block_size,
        blocks,
        dropped: n % block_size,
    })
}

/// `S(k) = X(1) + ... + X(k)` for `k = 1..n`.
pub fn partial_sums(increments: &Trace) -> Vec<f64> {
    let mut s = 0.0;
    increments
        .values()
        .iter()
        .map(|x| {
            s += x;
            s
        })
        .collect()
}
