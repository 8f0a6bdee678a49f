//! Exact small-scale ground truth: Catalan numbers, exhaustive shape
//! enumeration and a mechanical check that shuffle-then-rotate maps
//! exactly `2n + 1` arrangements onto every shape.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::shape::{self, ShapeSequence};

/// Largest `n` whose Catalan number fits in a `u64`.
pub const MAX_CATALAN_N: u64 = 33;
/// Largest `n` accepted by [`enumerate_shapes`].
pub const MAX_ENUMERATE_N: u64 = 14;
/// Largest `n` accepted by [`verify_cycle_lemma`].
pub const MAX_CYCLE_LEMMA_N: u64 = 6;

/// Number of binary tree shapes with `n` internal nodes, from the
/// convolution recurrence.
pub fn catalan_exact(n: u64) -> Result<u64> {
    if n > MAX_CATALAN_N {
        return Err(Error::Overflow(format!(
            "Catalan({n}) does not fit in 64 bits (n <= {MAX_CATALAN_N})"
        )));
    }
    let n = n as usize;
    let mut c = vec![0u128; n + 1];
    c[0] = 1;
    for k in 0..n {
        c[k + 1] = (0..=k).map(|i| c[i] * c[k - i]).sum();
    }
    Ok(c[n] as u64)
}

/// A shape as a bit string, most significant bit first, function = 1,
/// leaf = 0. The length is implied by `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShapeKey {
    bits: u64,
    len: u8,
}

impl ShapeKey {
    pub fn of(seq: &ShapeSequence) -> ShapeKey {
        assert!(seq.len() <= 64, "shape keys cover at most 64 tags");
        let bits = seq
            .as_bytes()
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | b as u64);
        ShapeKey {
            bits,
            len: seq.len() as u8,
        }
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn decode(self) -> ShapeSequence {
        let len = self.len as u32;
        let tags: Vec<u8> = (0..len)
            .map(|i| ((self.bits >> (len - 1 - i)) & 1) as u8)
            .collect();
        ShapeSequence::from_raw(tags)
    }
}

impl fmt::Display for ShapeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.len as usize)
    }
}

/// Occurrence counts per shape.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ShapeCensus {
    pub n: u64,
    pub counts: BTreeMap<ShapeKey, u64>,
}

impl ShapeCensus {
    pub fn new(n: u64) -> Self {
        ShapeCensus {
            n,
            counts: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, seq: &ShapeSequence) {
        *self.counts.entry(ShapeKey::of(seq)).or_insert(0) += 1;
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// All valid shapes with `n` internal nodes in lexicographic order of
/// their tag strings, with `F` (function) sorting before `L` (leaf).
pub fn enumerate_shapes(n: u64) -> Result<Vec<ShapeSequence>> {
    if n > MAX_ENUMERATE_N {
        return Err(Error::TooLarge {
            what: "internal node count for enumeration",
            value: n,
            limit: MAX_ENUMERATE_N,
        });
    }
    let n = n as usize;
    let len = 2 * n + 1;
    let mut out = Vec::with_capacity(catalan_exact(n as u64)? as usize);
    let mut prefix = Vec::with_capacity(len);

    // Depth-first over prefixes; `open` is the number of unfilled slots.
    fn extend(
        prefix: &mut Vec<u8>,
        funcs_left: usize,
        leaves_left: usize,
        open: usize,
        out: &mut Vec<ShapeSequence>,
    ) {
        if funcs_left == 0 && leaves_left == 0 {
            out.push(ShapeSequence::from_raw(prefix.clone()));
            return;
        }
        if open == 0 {
            return;
        }
        if funcs_left > 0 {
            prefix.push(1);
            extend(prefix, funcs_left - 1, leaves_left, open + 1, out);
            prefix.pop();
        }
        // A leaf may only close the last slot once every tag is placed.
        if leaves_left > 0 && (open > 1 || (funcs_left == 0 && leaves_left == 1)) {
            prefix.push(0);
            extend(prefix, funcs_left, leaves_left - 1, open - 1, out);
            prefix.pop();
        }
    }

    extend(&mut prefix, n, n + 1, 1, &mut out);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleLemmaReport {
    pub n: u64,
    pub arrangements: u64,
    pub shapes: u64,
    /// Common fiber size when every shape has the same number of
    /// preimages, otherwise `None`.
    pub fiber_size: Option<u64>,
    pub pass: bool,
    pub diagnostics: Vec<String>,
}

/// Checks every arrangement of `n` functions and `n + 1` leaves: exactly
/// one rotation must be valid, the first-minimum rotation must be that
/// one, and each of the Catalan(n) shapes must be reached `2n + 1` times.
pub fn verify_cycle_lemma(n: u64) -> Result<CycleLemmaReport> {
    if n > MAX_CYCLE_LEMMA_N {
        return Err(Error::TooLarge {
            what: "internal node count for the cycle-lemma check",
            value: n,
            limit: MAX_CYCLE_LEMMA_N,
        });
    }
    let len = (2 * n + 1) as usize;
    let mut census = ShapeCensus::new(n);
    let mut diagnostics = Vec::new();
    let mut arrangements = 0u64;

    for mask in 0u64..(1u64 << len) {
        if mask.count_ones() as u64 != n {
            continue;
        }
        arrangements += 1;
        let seq = ShapeKey {
            bits: mask,
            len: len as u8,
        }
        .decode();

        let mut valid_rotations = Vec::new();
        for k in 0..len {
            let mut r = seq.clone();
            shape::rotate_left(&mut r, k)?;
            if shape::is_valid_preorder(&r) {
                valid_rotations.push(r);
            }
        }
        let mut chosen = seq.clone();
        shape::rotate_to_valid(&mut chosen);

        if valid_rotations.len() != 1 {
            diagnostics.push(format!(
                "{seq}: {} valid rotations, expected 1",
                valid_rotations.len()
            ));
        } else if valid_rotations[0] != chosen {
            diagnostics.push(format!(
                "{seq}: first-minimum rotation gives {chosen}, valid rotation is {}",
                valid_rotations[0]
            ));
        }
        if shape::is_valid_preorder(&chosen) {
            census.record(&chosen);
        }
    }

    let catalan = catalan_exact(n)?;
    let fiber = 2 * n + 1;
    let sizes: Vec<u64> = census.counts.values().copied().collect();
    let fiber_size = match sizes.first() {
        Some(&first) if sizes.iter().all(|&s| s == first) => Some(first),
        _ => None,
    };
    if census.distinct() as u64 != catalan {
        diagnostics.push(format!(
            "{} shapes reached, Catalan({n}) = {catalan}",
            census.distinct()
        ));
    }
    if fiber_size != Some(fiber) {
        diagnostics.push(format!("fiber sizes {sizes:?}, expected all {fiber}"));
    }
    Ok(CycleLemmaReport {
        n,
        arrangements,
        shapes: census.distinct() as u64,
        fiber_size,
        pass: diagnostics.is_empty(),
        diagnostics,
    })
}
