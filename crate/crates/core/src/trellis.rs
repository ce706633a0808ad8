//! Factor-graph wiring with full and partial stage permutations.
//!
//! Columns are indexed from the channel side: PE column `c` (0-based) joins
//! variable column `c` and `c + 1`, variable column 0 holds the channel LLRs
//! and variable column `n` the frozen-bit priors. On the identity schedule PE
//! column `c` pairs row `r` with `r + 2^c` inside blocks of `2^(c+1)` rows.
//!
//! A valid schedule is a tree of row cosets. For every column `c` and row `r`,
//! let `S_c(r)` be the set of strides that row `r` sees on columns `0..=c`.
//! The rows reachable from `r` through those strides form the subgraph of `r`
//! at column `c`; every row in it must see the same stride set and the same
//! stride on column `c`. Uniform column strides (any full permutation)
//! satisfy this trivially, and a partial permutation rearranges the top
//! levels of one subgraph whose window strides are uniform.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::code::log2_exact;
use crate::{Bits, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrideSchedule {
    block_len: usize,
    stages: usize,
    /// log2 of the stride, indexed `[column * block_len + row]`.
    shift: Vec<u8>,
}

/// One partial permutation: stages `rho_level ..= rho_level + rho_range - 1`
/// (1-based, channel side first) of subgraph `subgraph_index` are reordered
/// by `stage_order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationEvent {
    pub rho_range: usize,
    pub rho_level: usize,
    pub subgraph_index: usize,
    /// New window stage `i` takes the stride previously at window stage
    /// `stage_order[i]`. Always a derangement.
    pub stage_order: Vec<usize>,
    pub n_zero: usize,
}

impl PermutationEvent {
    pub fn new(
        stages: usize,
        rho_range: usize,
        rho_level: usize,
        subgraph_index: usize,
        stage_order: Vec<usize>,
    ) -> Result<Self> {
        if rho_range < 2 || rho_range > stages {
            return Err(Error::InvalidEvent(format!("rho_range {rho_range} outside 2..={stages}")));
        }
        if rho_level < 1 || rho_level > stages - rho_range + 1 {
            return Err(Error::InvalidEvent(format!(
                "rho_level {rho_level} outside 1..={}",
                stages - rho_range + 1
            )));
        }
        let top = rho_level + rho_range - 1;
        let subgraphs = 1usize << (stages - top);
        if subgraph_index >= subgraphs {
            return Err(Error::InvalidEvent(format!(
                "subgraph {subgraph_index} out of {subgraphs}"
            )));
        }
        check_permutation(&stage_order, rho_range).map_err(Error::InvalidEvent)?;
        if stage_order.iter().enumerate().any(|(i, &s)| i == s) {
            return Err(Error::InvalidEvent(format!(
                "stage order {stage_order:?} leaves a stage in place"
            )));
        }
        Ok(PermutationEvent {
            rho_range,
            rho_level,
            subgraph_index,
            stage_order,
            n_zero: n_zero(rho_level, rho_range),
        })
    }

    /// Highest permuted stage, 1-based.
    pub fn top_level(&self) -> usize {
        self.rho_level + self.rho_range - 1
    }

    /// Rows in the permuted subgraph.
    pub fn block_rows(&self) -> usize {
        1 << self.top_level()
    }
}

/// Variable nodes invalidated by a partial permutation:
/// `2^(level + range - 1) * (range - 1)`.
pub fn n_zero(rho_level: usize, rho_range: usize) -> usize {
    (1usize << (rho_level + rho_range - 1)) * (rho_range - 1)
}

fn check_permutation(order: &[usize], len: usize) -> std::result::Result<(), String> {
    if order.len() != len {
        return Err(format!("expected a permutation of {len} stages, got {}", order.len()));
    }
    let mut seen = vec![false; len];
    for &s in order {
        if s >= len || std::mem::replace(&mut seen[s], true) {
            return Err(format!("{order:?} is not a permutation of 0..{len}"));
        }
    }
    Ok(())
}

impl StrideSchedule {
    pub fn identity(block_len: usize) -> Result<Self> {
        let stages = log2_exact(block_len)?;
        let shift = (0..stages).flat_map(|c| std::iter::repeat_n(c as u8, block_len)).collect();
        Ok(StrideSchedule { block_len, stages, shift })
    }

    /// Uniform schedule where column `c` uses stride `2^order[c]`.
    pub fn full_permute(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.stages).map_err(Error::InvalidPermutation)?;
        let shift = order
            .iter()
            .flat_map(|&s| std::iter::repeat_n(s as u8, self.block_len))
            .collect();
        Ok(StrideSchedule { block_len: self.block_len, stages: self.stages, shift })
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    /// Stride of PE column `col` (0-based) at `row`.
    pub fn stride(&self, col: usize, row: usize) -> usize {
        1 << self.shift[col * self.block_len + row]
    }

    fn shift_at(&self, col: usize, row: usize) -> u8 {
        self.shift[col * self.block_len + row]
    }

    /// Bitmask of the strides row `row` sees on columns `0..cols`.
    fn span_mask(&self, cols: usize, row: usize) -> usize {
        (0..cols).fold(0, |m, c| m | self.stride(c, row))
    }

    /// Subgraph roots at stage `top` (1-based): the smallest row of every
    /// coset spanned by columns `0..top`, in ascending order.
    pub fn subgraph_roots(&self, top: usize) -> Vec<usize> {
        (0..self.block_len)
            .filter(|&r| r & self.span_mask(top, r) == 0)
            .collect()
    }

    /// Rows of subgraph `index` at stage `top` (1-based), ascending.
    pub fn subgraph_rows(&self, top: usize, index: usize) -> Vec<usize> {
        let root = self.subgraph_roots(top)[index];
        let mask = self.span_mask(top, root);
        (0..self.block_len).filter(|&r| r & !mask == root).collect()
    }

    /// Whether every row of the subgraph shares its window strides, which is
    /// what a partial permutation of that window needs.
    pub fn window_is_uniform(&self, rho_level: usize, rho_range: usize, index: usize) -> bool {
        let top = rho_level + rho_range - 1;
        let rows = self.subgraph_rows(top, index);
        (rho_level - 1..top).all(|c| {
            let s = self.shift_at(c, rows[0]);
            rows.iter().all(|&r| self.shift_at(c, r) == s)
        })
    }

    /// Subgraph indices that admit a partial permutation of the given window.
    pub fn eligible_subgraphs(&self, rho_level: usize, rho_range: usize) -> Vec<usize> {
        let top = rho_level + rho_range - 1;
        (0..self.subgraph_roots(top).len())
            .filter(|&i| self.window_is_uniform(rho_level, rho_range, i))
            .collect()
    }

    pub fn partial_permute(&self, ev: &PermutationEvent) -> Result<Self> {
        if ev.top_level() > self.stages {
            return Err(Error::InvalidEvent(format!(
                "window reaches stage {} of {}",
                ev.top_level(),
                self.stages
            )));
        }
        // re-validate against this schedule's depth
        PermutationEvent::new(
            self.stages,
            ev.rho_range,
            ev.rho_level,
            ev.subgraph_index,
            ev.stage_order.clone(),
        )?;
        if !self.window_is_uniform(ev.rho_level, ev.rho_range, ev.subgraph_index) {
            return Err(Error::InvalidEvent(format!(
                "window {}..={} of subgraph {} has row-dependent strides",
                ev.rho_level,
                ev.top_level(),
                ev.subgraph_index
            )));
        }
        let rows = self.subgraph_rows(ev.top_level(), ev.subgraph_index);
        let first = ev.rho_level - 1;
        let old: Vec<u8> = (0..ev.rho_range).map(|i| self.shift_at(first + i, rows[0])).collect();
        let mut next = self.clone();
        for (i, &src) in ev.stage_order.iter().enumerate() {
            let base = (first + i) * self.block_len;
            for &r in &rows {
                next.shift[base + r] = old[src];
            }
        }
        Ok(next)
    }

    /// Variable nodes `(column, row)` strictly inside the event's window,
    /// i.e. variable columns `rho_level ..= rho_level + rho_range - 2`
    /// (0-based) over the event's subgraph. Evaluated on the schedule the
    /// event is applied to.
    pub fn modified_nodes(&self, ev: &PermutationEvent) -> Vec<(usize, usize)> {
        let rows = self.subgraph_rows(ev.top_level(), ev.subgraph_index);
        (ev.rho_level..ev.top_level())
            .flat_map(|col| rows.iter().map(move |&r| (col, r)))
            .collect()
    }

    /// Hard-bit pass from the prior side to the channel side: at every PE the
    /// upper row takes the XOR, the lower row passes through.
    pub fn graph_encode(&self, u: &[u8]) -> Result<Bits> {
        if u.len() != self.block_len {
            return Err(Error::LengthMismatch { expected: self.block_len, got: u.len() });
        }
        let mut v = u.to_vec();
        for col in (0..self.stages).rev() {
            for (up, lo) in self.column_pairs(col) {
                v[up] ^= v[lo];
            }
        }
        Ok(v)
    }

    /// `(upper, lower)` row pairs joined by PE column `col`.
    pub fn column_pairs(&self, col: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.block_len).filter_map(move |r| {
            let s = self.stride(col, r);
            (r & s == 0).then_some((r, r + s))
        })
    }

    /// Checks the structural invariants, returning the first violation.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let full = self.block_len - 1;
        for r in 0..self.block_len {
            if self.span_mask(self.stages, r) != full {
                return Err(format!("row {r} does not use every stride exactly once"));
            }
        }
        for c in 0..self.stages {
            for r in 0..self.block_len {
                let s = self.stride(c, r);
                if self.stride(c, r ^ s) != s {
                    return Err(format!("column {c}: rows {r} and {} disagree on stride", r ^ s));
                }
                let mask = self.span_mask(c + 1, r);
                for b in (0..self.stages).map(|b| 1usize << b).filter(|b| mask & b != 0) {
                    let q = r ^ b;
                    if self.span_mask(c + 1, q) != mask || self.stride(c, q) != s {
                        return Err(format!("column {c}: subgraph of row {r} is inconsistent at row {q}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// One line per PE column with run-length encoded strides,
    /// e.g. `1: 2x4 1x4`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for c in 0..self.stages {
            let _ = write!(out, "{}:", c + 1);
            let mut r = 0;
            while r < self.block_len {
                let s = self.stride(c, r);
                let run = (r..self.block_len).take_while(|&q| self.stride(c, q) == s).count();
                let _ = write!(out, " {s}x{run}");
                r += run;
            }
            out.push('\n');
        }
        out
    }

    /// 64-bit FNV-1a digest of the stride table.
    pub fn digest(&self) -> u64 {
        self.shift.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
            (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
        })
    }

    #[doc(hidden)]
    pub fn corrupt_for_test(&mut self, col: usize, row: usize, shift: u8) {
        self.shift[col * self.block_len + row] = shift;
    }
}

/// Variable nodes whose message meaning differs between two wirings of the
/// same code, found by re-deriving every node symbolically.
///
/// Each node is interned as a free-algebra term twice: built from the prior
/// side (what it computes from `u`) and from the channel side (what it
/// computes from `x`). A node counts as changed only when both terms differ,
/// i.e. when neither of its two incoming message streams is still valid.
/// Returned sorted by `(col, row)`.
pub fn rederived_diff(before: &StrideSchedule, after: &StrideSchedule) -> Vec<(usize, usize)> {
    assert_eq!(before.block_len, after.block_len, "schedules must share a block length");
    let (n, big_n) = (before.stages, before.block_len);
    let mut table: HashMap<(u8, usize, usize), usize> = HashMap::new();
    let mut terms = |s: &StrideSchedule| {
        let mut intern = |k: (u8, usize, usize)| {
            let next = table.len() + 2 * big_n;
            *table.entry(k).or_insert(next)
        };
        let mut fwd = vec![vec![0; big_n]; n + 1];
        fwd[n] = (0..big_n).collect();
        for c in (0..n).rev() {
            for (up, lo) in s.column_pairs(c) {
                fwd[c][up] = intern((0, fwd[c + 1][up], fwd[c + 1][lo]));
                fwd[c][lo] = intern((1, fwd[c + 1][up], fwd[c + 1][lo]));
            }
        }
        let mut bwd = vec![vec![0; big_n]; n + 1];
        bwd[0] = (big_n..2 * big_n).collect();
        for c in 0..n {
            for (up, lo) in s.column_pairs(c) {
                bwd[c + 1][up] = intern((2, bwd[c][up], bwd[c][lo]));
                bwd[c + 1][lo] = intern((3, bwd[c][up], bwd[c][lo]));
            }
        }
        (fwd, bwd)
    };
    let (f0, b0) = terms(before);
    let (f1, b1) = terms(after);
    (0..=n)
        .flat_map(|c| (0..big_n).map(move |r| (c, r)))
        .filter(|&(c, r)| f0[c][r] != f1[c][r] && b0[c][r] != b1[c][r])
        .collect()
}
